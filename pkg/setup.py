#!/usr/bin/env python3
"""
Setup script for the cluster braiding verifier.
Checks the Python version and packages, writes a default .env and runs a
short installation self-test.
"""

import sys
from pathlib import Path

REQUIRED_PACKAGES = [
    'numpy',
    'pandas',
    'sympy',
    'mpmath',
    'scipy',
    'networkx',
    'dotenv',
    'fastapi',
    'uvicorn',
    'pydantic',
]


def check_python_version():
    """Check if Python version is compatible."""
    if sys.version_info < (3, 9):
        print("❌ Python 3.9 or higher is required!")
        print(f"Current version: {sys.version}")
        return False
    print(f"✅ Python version: {sys.version}")
    return True


def check_dependencies():
    """Check if all required dependencies are installed."""
    missing_packages = []

    for package in REQUIRED_PACKAGES:
        try:
            __import__(package)
            print(f"✅ {package} is installed")
        except ImportError:
            print(f"❌ {package} is NOT installed")
            missing_packages.append(package)

    if missing_packages:
        print("\n📦 To install missing packages, run:")
        print("pip install -r requirements.txt")
        return False

    print("✅ All required packages are installed!")
    return True


def setup_environment():
    """Write the default .env file if it doesn't exist and validate it."""
    from config import load_settings, write_env_file

    env_file = Path(".env")
    if not env_file.exists():
        print("📝 Creating .env file...")
        write_env_file(str(env_file))
        print("✅ .env file created with default settings")
    else:
        print("✅ .env file exists")

    try:
        settings = load_settings()
    except ValueError as e:
        print(f"❌ Invalid setting in .env: {e}")
        return False
    print(f"✅ Settings: level={settings.level}, seed={settings.seed}, jobs={settings.jobs}")
    return True


def test_installation():
    """Run a few quick checks from every layer."""
    print("\n🧪 Testing installation...")

    try:
        print("Testing exact braid relations (n=3, y-seed)...")
        from braid_classical import verify_braid_relations
        report = verify_braid_relations(3, "y")
        print(f"{'✅' if report.is_pass else '❌'} Braid relations: {report.status.value}")

        print("Testing the Kashaev matrix (N=3, exact)...")
        from root_of_unity import verify_rk
        report = verify_rk(3, "cyclotomic")
        print(f"{'✅' if report.is_pass else '❌'} R^K braid relation: {report.status.value}")

        print("Testing the quantum dilogarithm...")
        from analytic import DilogParams, inversion_check
        import numpy as np
        report = inversion_check(DilogParams(0.8 * np.exp(1j * np.pi / 8)))
        print(f"{'✅' if report.is_pass else '❌'} Phi inversion relation: {report.status.value}")

        print("Testing sample inputs...")
        from seed_loader import create_sample_files, load_seed, load_y_values
        paths = create_sample_files("samples")
        seed = load_seed(paths["seed"])
        values = load_y_values(paths["y"])
        print(f"✅ Sample seed of size {seed.size} and {len(values)} y-values in samples/")

        print("\n🎉 Installation test completed successfully!")
        return True

    except Exception as e:
        print(f"❌ Installation test failed: {e}")
        print("Please check the error messages above and fix any issues.")
        return False


def main():
    """Main setup function."""
    print("🔧 Cluster Braiding Verifier - Setup")
    print("=" * 50)

    if not check_python_version():
        return

    print()

    if not check_dependencies():
        print("\n❌ Please install missing dependencies first.")
        return

    print()

    env_ready = setup_environment()

    print()

    if env_ready and test_installation():
        print("\n✅ Setup completed successfully!")
        print("\n🚀 You can now run the verifier with:")
        print("   python main_verifier.py checkall --level fast --pretty")
    else:
        print("\n❌ Setup completed with errors. Please check the issues above.")


if __name__ == "__main__":
    main()
