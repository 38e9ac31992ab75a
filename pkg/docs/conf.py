#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# hajlasz-lab documentation build configuration file

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

extensions = [
    'sphinx.ext.todo',
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.autosummary',
    'sphinx.ext.mathjax'
]

napoleon_google_docstring = True
napoleon_numpy_docstring = False

autodoc_mock_imports = ['numpy', 'scipy', 'cvxpy', 'tqdm']
autodoc_default_options = {'member-order': 'bysource',
                           'show-inheritance': True}
autosummary_generate = True

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'hajlasz-lab'
copyright = '2026, hajlasz-lab developers'
author = 'hajlasz-lab developers'

# bumpversion updates release
version = '0.1'
release = '0.1.0'

exclude_patterns = ['_build', '**.ipynb_checkpoints', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = True

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
html_show_sourcelink = False
htmlhelp_basename = 'hajlaszlabdoc'

latex_documents = [
    (master_doc, 'hajlaszlab.tex', 'hajlasz-lab Documentation', author, 'manual'),
]
man_pages = [
    (master_doc, 'hajlasz-lab', 'hajlasz-lab Documentation', [author], 1)
]
