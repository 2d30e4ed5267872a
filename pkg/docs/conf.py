# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.
#
# http://www.sphinx-doc.org/en/master/config

# -- Path setup --------------------------------------------------------------

import os
import sys
sys.path.insert(0, os.path.abspath('../'))

# -- Project information -----------------------------------------------------

project = 'bwelab'
copyright = '2024, bwelab developers'
author = 'bwelab developers'

# The full version, including alpha/beta/rc tags. deploy.sh passes it in.
release = ''
version = ''

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.imgmath',
    'sphinx.ext.viewcode',
    'sphinx.ext.githubpages',
    'sphinxcontrib.fulltoc',
    'sphinx.ext.napoleon'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
language = 'en'
exclude_patterns = ['_build']
pygments_style = None

autodoc_member_order = 'bysource'

# -- Options for HTML output -------------------------------------------------

import sphinx_bootstrap_theme

html_theme = 'bootstrap'
html_theme_path = sphinx_bootstrap_theme.get_html_theme_path()
html_theme_options = {
    'navbar_class': "navbar navbar-inverse",
    'navbar_fixed_top': "true",
    'navbar_pagenav': True,
    'source_link_position': "nav",
    'bootswatch_theme': "united",
    'bootstrap_version': "3",
}

html_static_path = []
html_sidebars = {
    '**': ['localtoc.html']
}

htmlhelp_basename = 'bwelabdoc'

# -- Options for other outputs -----------------------------------------------

latex_documents = [
    (master_doc, 'bwelab.tex', 'bwelab Documentation', author, 'manual'),
]

man_pages = [
    (master_doc, 'bwelab', 'bwelab Documentation', [author], 1)
]

texinfo_documents = [
    (master_doc, 'bwelab', 'bwelab Documentation', author, 'bwelab',
     'Learned bandwidth estimation lab.', 'Miscellaneous'),
]

epub_title = project
epub_exclude_files = ['search.html']

todo_include_todos = True
