import os
import sys
import logging
from datetime import datetime
import structlog


class CustomLogger:
    """JSON structured logging to stderr and, optionally, a timestamped file.

    stdout is left alone because the command line writes its reports there.

    Environment:
        NC_LOG_DIR    directory for log files (default ``logs``)
        NC_LOG_FILE   set to ``0`` to disable the file handler
        NC_LOG_LEVEL  level name (default ``INFO``)
    """

    def __init__(self, log_dir: str | None = None):
        self.level = getattr(logging, os.getenv("NC_LOG_LEVEL", "INFO").upper(), logging.INFO)
        self.file_enabled = os.getenv("NC_LOG_FILE", "1") != "0"
        self.log_file_path: str | None = None
        if self.file_enabled:
            self.logs_dir = os.path.join(os.getcwd(), log_dir or os.getenv("NC_LOG_DIR", "logs"))
            os.makedirs(self.logs_dir, exist_ok=True)
            log_file = f"{datetime.now().strftime('%m_%d_%Y_%H_%M_%S')}.log"
            self.log_file_path = os.path.join(self.logs_dir, log_file)

    def get_logger(self, name=__file__):
        logger_name = os.path.basename(name)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.level)
        console_handler.setFormatter(logging.Formatter("%(message)s"))
        handlers: list[logging.Handler] = [console_handler]

        if self.log_file_path:
            file_handler = logging.FileHandler(self.log_file_path)
            file_handler.setLevel(self.level)
            file_handler.setFormatter(logging.Formatter("%(message)s"))
            handlers.append(file_handler)

        logging.basicConfig(
            level=self.level,
            format="%(message)s",
            handlers=handlers,
        )

        structlog.configure(
            processors=[
                structlog.processors.TimeStamper(fmt="iso", utc=True, key="timestamp"),
                structlog.processors.add_log_level,
                structlog.processors.EventRenamer(to="event"),
                structlog.processors.JSONRenderer(),
            ],
            logger_factory=structlog.stdlib.LoggerFactory(),
            cache_logger_on_first_use=True,
        )

        return structlog.get_logger(logger_name)
