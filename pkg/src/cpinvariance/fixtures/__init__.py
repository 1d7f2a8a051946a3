from pathlib import Path

FIXTURE_DIR = Path(__file__).parent


def fixture_path(name: str) -> Path:
    return FIXTURE_DIR / name
