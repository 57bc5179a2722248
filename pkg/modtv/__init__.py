# Keep in sync with setup.py __version__
__version__ = "0.3.0"
