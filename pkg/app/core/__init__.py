"""Численное ядро: ядра, оценщики, кросс-валидация, изотонизация, проверки свойств."""
