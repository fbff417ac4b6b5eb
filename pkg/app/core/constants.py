"""Константы приложения."""

# Настройки приложения
APP_NAME = "monokernel"
APP_VERSION = "1.0.0"
APP_DESCRIPTION = "Kernel regression with monotonicity-preservation checks"

# Квадратура
QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 50
# Масса хвостов вне интервала интегрирования для ядер с бесконечным носителем
INTEGRATION_TAIL_MASS = 1e-14
# Масса хвостов для проверки лог-вогнутости
PROBE_TAIL_MASS = 1e-6

# Оценщики
NW_DENOMINATOR_FLOOR = 1e-300
PC_X0_SENTINEL = "x1_minus_h"
GRID_WIDTHS = 3.0
GRID_POINTS = 2001
# Сдвиг для проверки сохранения сдвига в команде check
SHIFT_CHECK_C = 10.0

# Кросс-валидация
CV_GRID_POINTS = 64
CV_REL_TOL = 1e-4
CV_MIN_GRID_POINTS = 8

# Проверки свойств
MONOTONE_TOL = 1e-9
LOG_CONCAVE_PROBES = 10_000
LOG_CONCAVE_SLACK = 1e-12
# Значения плотности ниже порога не сравниваются (underflow)
LOG_CONCAVE_PDF_FLOOR = 1e-250
NW_VIOLATION_MARGIN = 1e-9
PC_SEARCH_POINTS = 4096
PC_SEARCH_PASSES = 6
PC_SEARCH_START_WIDTHS = 8.0
PC_DROP_THRESHOLD = 1e-12

# Фаззинг
FUZZ_SEED = 20240601
FUZZ_CASES = 200
FUZZ_MAX_N = 30

# Генератор синтетических данных
SYNTH_INTERVAL = (-10.0, 10.0)

# Вывод
FLOAT_FORMAT = "%.17g"
FIXTURE_PREFIX = "fixture:"

# Коды завершения
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4
EXIT_IO = 5
