import sys
from pathlib import Path

# make the shared helpers importable regardless of pytest's import mode
sys.path.insert(0, str(Path(__file__).resolve().parent))
