"""Model zoo: nine model/prior pairs behind one uniform interface.

Models are selected by the string tags "LM-C", "LM-WI", "LM-NI",
"LM-L", "LR-N", "LR-L", "MM", "AFT-NH", "AFT-NI".
"""

from __future__ import annotations

from ..datagen import Dataset
from .aft import AFTModel
from .base import ConditionalSpec, Model
from .linear import ClosedFormLMPosterior, LinearModel
from .logistic import LogisticModel
from .mixture import MixtureModel, predictive_density

PRIOR_TAGS = (
    "LM-C",
    "LM-WI",
    "LM-NI",
    "LM-L",
    "LR-N",
    "LR-L",
    "MM",
    "AFT-NH",
    "AFT-NI",
)

FAMILY_OF = {
    "LM-C": "LM",
    "LM-WI": "LM",
    "LM-NI": "LM",
    "LM-L": "LM",
    "LR-N": "LR",
    "LR-L": "LR",
    "MM": "MM",
    "AFT-NH": "AFT",
    "AFT-NI": "AFT",
}


def get_model(
    prior_id: str,
    dataset: Dataset,
    H: int | None = None,
    parameterization: str = "marginal",
    hyper: dict | None = None,
) -> Model:
    """Build a model instance from its prior tag."""
    family = FAMILY_OF.get(prior_id)
    if family is None:
        raise ValueError(f"unknown prior tag {prior_id!r}; expected one of {PRIOR_TAGS}")
    if family == "LM":
        return LinearModel(dataset, prior_id, hyper)
    if family == "LR":
        return LogisticModel(dataset, prior_id, hyper)
    if family == "MM":
        if H is None:
            raise ValueError("mixture model needs H")
        return MixtureModel(dataset, H, parameterization, hyper)
    return AFTModel(dataset, prior_id, hyper)


__all__ = [
    "AFTModel",
    "ClosedFormLMPosterior",
    "ConditionalSpec",
    "FAMILY_OF",
    "LinearModel",
    "LogisticModel",
    "MixtureModel",
    "Model",
    "PRIOR_TAGS",
    "get_model",
    "predictive_density",
]
