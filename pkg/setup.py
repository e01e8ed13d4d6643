"""
Automated setup script for hermspde.
Creates a virtual environment, installs dependencies, runs the unit tests,
and optionally runs the bundled stability experiment.

Usage: python setup.py
"""
import os
import platform
import subprocess
import sys

VENV = "venv"
DEMO = "stability data/experiments/stability.json --out results/stability"


def section(title):
    print(f"\n{'='*70}\n📋 {title}\n{'='*70}")


def run_command(command, description, check=True):
    """Run a shell command under a section banner; False if it failed and check is set."""
    section(description)
    print(f"▶️  Command: {command}\n")
    if subprocess.run(command, shell=True).returncode != 0 and check:
        print(f"\n❌ Error: {description} failed")
        return False
    print(f"\n✅ {description} completed")
    return True


def venv_tools(is_windows):
    """Paths to the venv interpreter and pip."""
    if is_windows:
        return os.path.join(VENV, "Scripts", "python.exe"), os.path.join(VENV, "Scripts", "pip.exe")
    return os.path.join(VENV, "bin", "python"), os.path.join(VENV, "bin", "pip")


def main():
    print("""
╔════════════════════════════════════════════════════════════════════╗
║              🧮 hermspde - Automated Setup                         ║
╚════════════════════════════════════════════════════════════════════╝

Steps: create venv, install requirements, run unit tests, optional demo run.
""")

    if sys.version_info < (3, 9):
        sys.exit(f"❌ Python 3.9+ required, found {sys.version.split()[0]}")
    is_windows = platform.system() == "Windows"
    print(f"✅ Python {platform.python_version()} on {platform.system()}")

    if os.path.exists(VENV):
        section("Virtual environment already exists, reusing it")
    elif not run_command(f'"{sys.executable}" -m venv {VENV}', "Creating virtual environment"):
        sys.exit(1)

    python_exe, pip_exe = venv_tools(is_windows)
    run_command(f'"{python_exe}" -m pip install --upgrade pip', "Upgrading pip", check=False)
    if not run_command(f'"{pip_exe}" install -r requirements.txt', "Installing Python dependencies"):
        sys.exit(1)

    # test_acceptance takes minutes; the rest finish quickly
    if not run_command(f'"{python_exe}" -m unittest discover tests', "Running unit tests"):
        print("⚠️  Some tests failed, see the output above")

    section("Environment configuration")
    if os.path.exists(".env"):
        print("✅ .env file found")
    else:
        print("ℹ️  No .env file, defaults apply (copy .env.example to change them)")

    answer = input("\n🚀 Run the bundled stability experiment now? (y/n): ").strip().lower()
    if answer == "y":
        run_command(f'"{python_exe}" hermspde.py {DEMO}', "Stability experiment", check=False)
        print("📁 Results in results/stability/")
    else:
        activate = f"{VENV}\\Scripts\\activate" if is_windows else f"source {VENV}/bin/activate"
        section("To run an experiment later")
        print(f"   {activate}\n   python hermspde.py {DEMO}\n")


if __name__ == "__main__":
    main()
