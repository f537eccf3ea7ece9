from bergman_lab.mixins._criterion import CriterionMixin
from bergman_lab.mixins._hilbert_schmidt import HilbertSchmidtMixin
from bergman_lab.mixins._kernel import KernelMixin
from bergman_lab.mixins._metric import MetricMixin
from bergman_lab.mixins._weights import WeightMixin

__all__ = [
    "WeightMixin",
    "KernelMixin",
    "MetricMixin",
    "CriterionMixin",
    "HilbertSchmidtMixin",
]
