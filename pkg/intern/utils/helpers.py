import time
import re
from functools import wraps

from .constants import SOFTVERSION, SOFTBUILDDATE, IS_DEV_BUILD, SOFTSHA256


def timer(func):
    """Prints the boxed summary after `func`; the result's `.logger` supplies the counters."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.time()
        result = None
        try:
            result = func(*args, **kwargs)
        finally:
            elapsed = time.time() - start_time
            logger = getattr(result, "logger", None)
            if logger is not None:
                logger.info('')
                print_summary(logger, elapsed)
            else:
                print(f"Total time elapsed: {elapsed:.2f} seconds")
        return result
    return wrapper


def _colorize_art(lines):
    RESET = "\033[0m"
    start = (90, 140, 255)
    end   = (190, 235, 255)
    max_w = max((len(l) for l in lines if l.strip()), default=1)
    result = []
    for line in lines:
        row = []
        for i, ch in enumerate(line):
            if ch != ' ':
                t = i / max(max_w - 1, 1)
                r = int(start[0] + t * (end[0] - start[0]))
                g = int(start[1] + t * (end[1] - start[1]))
                b = int(start[2] + t * (end[2] - start[2]))
                row.append(f"\033[38;2;{r};{g};{b}m{ch}")
            else:
                row.append(ch)
        row.append(RESET)
        result.append("".join(row))
    return result


def print_summary(logger, elapsed):
    use_color = getattr(logger, 'use_color', True)

    BLUE   = "\033[38;2;90;140;255m"
    CYAN   = "\033[38;2;160;220;255m"
    WHITE  = "\033[97m"
    RED    = "\033[91m"
    YELLOW = "\033[33m"
    RESET  = "\033[0m"

    _ansi_escape = re.compile(r'\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])')

    def c(text, color):
        return f"{color}{text}{RESET}" if use_color else text

    def plain_len(text):
        return len(_ansi_escape.sub('', text))

    content_lines = []

    if logger.suites_run > 0:
        executed = logger.suites_run - logger.suites_skipped
        suites = f"{c('Suites:', WHITE)}  {c(str(logger.suites_passed), CYAN)}/{c(str(executed), CYAN)} passed"
        if logger.suites_skipped:
            suites += f", {c(str(logger.suites_skipped), CYAN)} skipped"
        content_lines.append(suites)
        content_lines.append(f"{c('Checks:', WHITE)}  {c(str(logger.checks_passed), CYAN)}/{c(str(logger.checks_run), CYAN)} passed")
        if logger.suites_failed:
            content_lines.append(c(f"{logger.suites_failed} suite(s) failed", RED))
        content_lines.append(None)

    if logger.warn_count > 0 or logger.error_count > 0:
        err_str = c(str(logger.error_count), RED)
        warn_str = c(str(logger.warn_count), YELLOW)
        content_lines.append(f"{c('Finished with ', WHITE)}{err_str}{c(' errors and ', WHITE)}{warn_str}{c(' warnings.', WHITE)}")
        for dedup_line in logger.get_dedup_summary():
            content_lines.append(c(dedup_line.strip(), YELLOW))
        content_lines.append(None)

    content_lines.append(f"{c('Total time elapsed:', WHITE)} {c(f'{elapsed:.2f} seconds', CYAN)}")

    W = max(48, max(plain_len(l) for l in content_lines if l is not None))

    def row(content=""):
        padding = max(0, W - plain_len(content) - 2)
        bar = c('║', BLUE) if use_color else '|'
        return f"{bar} {content}{' ' * padding} {bar}"

    if use_color:
        top = c(f"╔{'═' * W}╗", BLUE)
        div = c(f"╠{'═' * W}╣", BLUE)
        bot = c(f"╚{'═' * W}╝", BLUE)
    else:
        top = div = bot = f"+{'-' * W}+"

    output = [top]
    for line in content_lines:
        output.append(div if line is None else row(line))
    output.append(bot)

    print()
    print("\n".join(output))
    print()


_GLYPHS = {
    "W": ["██╗    ██╗", "██║    ██║", "██║ █╗ ██║", "██║███╗██║", "╚███╔███╔╝", " ╚══╝╚══╝ "],
    "E": ["███████╗", "██╔════╝", "█████╗  ", "██╔══╝  ", "███████╗", "╚══════╝"],
    "Y": ["██╗   ██╗", "╚██╗ ██╔╝", " ╚████╔╝ ", "  ╚██╔╝  ", "   ██║   ", "   ╚═╝   "],
    "L": ["██╗     ", "██║     ", "██║     ", "██║     ", "███████╗", "╚══════╝"],
    "C": [" ██████╗", "██╔════╝", "██║     ", "██║     ", "╚██████╗", " ╚═════╝"],
    "O": [" ██████╗ ", "██╔═══██╗", "██║   ██║", "██║   ██║", "╚██████╔╝", " ╚═════╝ "],
    "N": ["███╗   ██╗", "████╗  ██║", "██╔██╗ ██║", "██║╚██╗██║", "██║ ╚████║", "╚═╝  ╚═══╝"],
}


def _banner(word: str) -> list:
    return ["".join(_GLYPHS[ch][row] for ch in word) for row in range(6)]


def print_header():
    lines = _banner("WEYLCONE")
    max_w = max(len(l) for l in lines)
    colored = _colorize_art(lines)

    CYAN = "\033[38;2;160;220;255m"
    RESET = "\033[0m"

    if IS_DEV_BUILD:
        extra_lines = [f"WeylCone {SOFTVERSION} dev"]
    else:
        extra_lines = [
            f"WeylCone {SOFTVERSION} - {SOFTBUILDDATE}",
            f"SHA256 {SOFTSHA256}",
        ]

    print()
    print("\n".join(colored))
    print()
    for line in extra_lines:
        print(f"{CYAN}{line.center(max_w)}{RESET}")
    print()
