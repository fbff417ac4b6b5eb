"""
Утилиты monokernel.

Содержит помощники для логирования.
"""
