"""Run every sample configuration under configs/ through the batch entrypoint."""
import glob
import subprocess
import sys

for path in sorted(glob.glob("configs/*.json")):
    subprocess.run([sys.executable, "app.py", "--config", path, "--quiet"])
