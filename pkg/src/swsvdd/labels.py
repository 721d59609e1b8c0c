"""Binary class labels for the water-saturation task."""

from enum import Enum


class ClassLabel(Enum):
    """Water saturation class. HIGH is the majority class, LOW the minority
    (target) class that the one-class model is trained on."""

    HIGH = "HIGH"
    LOW = "LOW"

    def __str__(self) -> str:
        return self.value
