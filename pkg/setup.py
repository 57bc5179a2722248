# -*- coding: utf-8 -*-
try:
    from setuptools import setup, find_packages
except ImportError:
    import distribute_setup

    distribute_setup.use_setuptools()
    from setuptools import setup, find_packages

import sys

# Keep in sync with modtv/__init__.py __version__
__version__ = "0.3.0"

long_desc = """
modtv finds the leading module of a graph, the node set of largest modularity, by maximising the
modularity total variation over a box with an active-set gradient method, and ships the
spectral baseline, global search strategies and exhaustive oracles used to check it.
"""

requires = ["numpy>=1.20", "scipy>=1.6"]

if sys.version_info < (3, 7):
    print("ERROR: modtv requires at least Python 3.7 to run.")
    sys.exit(1)


setup(
    name="modtv",
    version=__version__,
    license="BSD",
    description="Leading module detection by modularity total variation",
    long_description=long_desc,
    zip_safe=False,
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    platforms="any",
    packages=find_packages(exclude=["tests"]),
    include_package_data=True,
    entry_points={
        "console_scripts": [
            "modtv = modtv.cli:main",
        ],
    },
    install_requires=requires,
)
