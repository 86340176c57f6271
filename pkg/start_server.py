"""
Startup script for the cluster braiding verifier API.
Checks dependencies and settings, then launches uvicorn with api:app.
"""

import sys

from config import configure_logging, load_settings


def check_dependencies():
    """Check if all required dependencies are installed."""
    required_packages = [
        'fastapi',
        'uvicorn',
        'pydantic',
        'numpy',
        'sympy',
        'mpmath',
    ]

    missing = []
    for package in required_packages:
        try:
            __import__(package.replace('-', '_').replace('.', '_'))
        except ImportError:
            missing.append(package)

    if missing:
        print(f"❌ Missing required packages: {', '.join(missing)}")
        print("Install them with: pip install -r requirements.txt")
        return False

    return True


def start_api_server(settings):
    """Start the FastAPI server."""
    print("🚀 Starting API server...")

    try:
        import uvicorn
        uvicorn.run("api:app", host=settings.api_host, port=settings.api_port, reload=False,
                    log_level=settings.log_level.lower())
    except KeyboardInterrupt:
        print("\n👋 Server stopped by user")
    except Exception as e:
        print(f"❌ Error starting server: {e}")


def main(api_only: bool = False):
    """Main startup function."""
    if not check_dependencies():
        return
    try:
        settings = load_settings()
    except ValueError as e:
        print(f"❌ Invalid configuration: {e}")
        return
    configure_logging(settings.log_level)

    if not api_only:
        print("🔧 Cluster Braiding Verifier")
        print("=" * 50)
        print(f"API Server: http://localhost:{settings.api_port}")
        print(f"Docs:       http://localhost:{settings.api_port}/docs")
        print(f"Suite level: {settings.level}, seed {settings.seed}, {settings.jobs} jobs")
        print("\nPress Ctrl+C to stop")
        print("=" * 50)

    start_api_server(settings)


if __name__ == "__main__":
    if len(sys.argv) > 1:
        if sys.argv[1] == "--api-only":
            main(api_only=True)
        elif sys.argv[1] == "--help":
            print("""
Cluster Braiding Verifier - Startup Options:

python start_server.py              # Print the banner and start the API server
python start_server.py --api-only   # Start only the API server
python start_server.py --help       # Show this help

Alternative ways to run:
python api.py                       # Direct API server start
python main_verifier.py --help      # Command-line verifier
""")
        else:
            print(f"Unknown option: {sys.argv[1]}")
            print("Use --help for available options")
    else:
        main()
