# -*- coding: utf-8 -*-
#
# modtv documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys
import os
import subprocess
import re

# General configuration
# ---------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.ifconfig",
    "sphinx_copybutton",
]

read_the_docs_build = os.environ.get("READTHEDOCS", None) == "True"

# Get a description of the current position
git_tag = subprocess.run(["git", "describe", "--tags"], capture_output=True).stdout
git_tag = git_tag.decode("ascii").strip()

# Sphinx sets the working directory to 'source', the package lives two levels up
sys.path.append("../../")

# Check if it matches a pure tag number vX.Y.Z, rather than vX.Y.Z-91-g8676988 which is how
# non-tagged commits are described (ie. relative to the last tag)
if re.match(r"^v\d+\.\d+\.\d+$", git_tag):
    version = git_tag
    release = git_tag
    documentation_build = "readthedocs" if read_the_docs_build else "release"
else:
    version = "'latest'"
    release = "'latest'"
    documentation_build = "readthedocs_latest" if read_the_docs_build else "development"

try:
    import sphinxcontrib.spelling  # noqa: F401

    extensions.append("sphinxcontrib.spelling")
except ImportError:
    pass

spelling_word_list_filename = "spelling_wordlist.txt"
spelling_lang = "en_US"

autodoc_member_order = "bysource"
autodoc_typehints = "description"

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "modtv"
copyright = "2022, the modtv developers"

exclude_trees = []
pygments_style = "sphinx"

# Options for HTML output
# -----------------------

html_theme = "furo"
html_title = "modtv"


def setup(app):
    app.add_config_value("documentation_build", "development", True)
