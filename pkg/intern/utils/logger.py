import re, sys
from datetime import datetime


class Logger:
    COLOR = {
        "INFO": "\033[97m",
        "WARN": "\033[33m",
        "ERROR": "\033[91m",
        "DEBUG": "\033[35m",
        "PASS": "\033[92m",
        "FAIL": "\033[91m",
        "RESET": "\033[0m"
    }

    CONTEXT_COLORS = {
        "EXPR": ("\033[96m", "EXPR"),
        "CALC": ("\033[36m", "CALC"),
        "CRW": ("\033[95m", "CRW"),
        "CONE": ("\033[94m", "CONE"),
        "RED": ("\033[93m", "RED"),
        "CAT": ("\033[92m", "CAT"),
        "SUITE": ("\033[35m", "SUITE"),
        "CFG": ("\033[90m", "CFG"),
    }

    _ansi_escape = re.compile(r'\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])')

    def __init__(self, verbose=False, use_color=True, log_file=None, context=None, parent=None, stream=None):
        if parent:
            self.verbose = parent.verbose
            self.use_color = parent.use_color
            self.log_file = parent.log_file
            self.stream = parent.stream
            self.root = parent.root
        else:
            self.verbose = verbose
            self.use_color = use_color
            self.log_file = log_file
            self.stream = stream
            self.warn_count = 0
            self.error_count = 0
            self.root = self
            self._dedup_counts: dict[tuple, int] = {}

            self.suites_run     = 0
            self.suites_passed  = 0
            self.suites_failed  = 0
            self.suites_skipped = 0
            self.checks_run     = 0
            self.checks_passed  = 0

        self.context = context.upper() if context else None
        self.context_label = self.context

        if self.context:
            color, label = self.CONTEXT_COLORS.get(self.context, (None, self.context))
            self.context_label = label
            if color and self.use_color:
                self.prefix = f"{color}[{label}]{self.COLOR['RESET']}"
            else:
                self.prefix = f"[{label}]"
        else:
            self.prefix = ""

    def with_context(self, context: str) -> "Logger":
        return Logger(context=context, parent=self)

    def _write_to_file(self, text):
        if self.log_file:
            try:
                with self.log_file.open("a", encoding="utf-8") as f:
                    f.write(text + "\n")
            except OSError:
                pass

    def _emit(self, line: str):
        print(line, file=self.stream or sys.stdout)

    def _print(self, level, message, console_only=False):
        if level == "WARN":
            self.root.warn_count += 1
        elif level == "ERROR":
            self.root.error_count += 1

        # Repeated warn/error lines go to the log file only.
        suppress_console = False
        if level in ("WARN", "ERROR"):
            key = (level, message)
            prev = self.root._dedup_counts.get(key, 0)
            self.root._dedup_counts[key] = prev + 1
            suppress_console = prev > 0

        now = datetime.now()

        if not suppress_console and (self.verbose or level != "DEBUG"):
            stamp = now.strftime("%H:%M:%S")
            prefix_part = f"{self.prefix} " if self.prefix else ""
            if level == "INFO":
                line = f"{stamp} | {prefix_part}{message}"
            elif self.use_color:
                color = self.COLOR[level]
                body = message.replace(self.COLOR['RESET'], color)
                line = f"{stamp} | {prefix_part}{color}[{level}]{self.COLOR['RESET']} {color}{body}{self.COLOR['RESET']}"
            else:
                line = f"{stamp} | {prefix_part}[{level}] {message}"
            self._emit(line)

        if self.log_file and not console_only:
            clean_message = self._ansi_escape.sub('', message)
            stamp = now.strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
            context_str = f"[{self.context_label}] " if self.context_label else ""
            self._write_to_file(f"{stamp}\t[{level}] {context_str}{clean_message}")

    def verdict(self, passed: bool) -> str:
        word = "PASS" if passed else "FAIL"
        if not self.use_color:
            return word
        return f"{self.COLOR[word]}{word}{self.COLOR['RESET']}"

    def get_dedup_summary(self) -> list:
        lines = []
        for (level, message), count in self.root._dedup_counts.items():
            if count > 1:
                clean_msg = self._ansi_escape.sub('', message)
                lines.append(f"  [{level}] \"{clean_msg}\" - seen {count}x (first shown above)")
        return lines

    def info(self, message): self._print("INFO", message)
    def warn(self, message): self._print("WARN", message)
    def error(self, message): self._print("ERROR", message)
    def debug(self, message): self._print("DEBUG", message)

    def write_block(self, data: str, source: str = "report"):
        """Verbatim multi-line block (a JSON report) into the log file."""
        if self.log_file:
            stamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
            src = f"{self.context_label}/{source}" if self.context_label else source
            self._write_to_file(f"{stamp}\t--- BEGIN {src}\n{self._ansi_escape.sub('', data)}\n{stamp}\t--- END {src}")

    def count_suite(self, outcome: str, checks_run: int = 0, checks_passed: int = 0):
        """outcome is 'pass', 'fail' or 'skip'."""
        root = self.root
        root.suites_run += 1
        if outcome == "skip":
            root.suites_skipped += 1
        elif outcome == "pass":
            root.suites_passed += 1
        else:
            root.suites_failed += 1
        root.checks_run += checks_run
        root.checks_passed += checks_passed
