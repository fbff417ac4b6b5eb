from __future__ import annotations
from dotenv import load_dotenv
load_dotenv()

"""
cli_runner.py
~~~~~~~~~~~~~

Точка входа monokernel.

* Разбирает аргументы командной строки (см. `app.main.build_parser`).
* Настраивает structlog (stderr) по LOG_LEVEL / LOG_JSON или флагам.
* Выполняет команду и возвращает код завершения.

Запуск:

    python cli_runner.py cv --input fixture:paper --method gm --kernel gaussian
    python cli_runner.py check --method pc --kernel rectangular --fuzz 50
"""

import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
