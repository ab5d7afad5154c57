# -*- coding: utf-8 -*-
#
# wrenchkit documentation build configuration file.
#
import os
import sys
import sphinx_rtd_theme
sys.path.insert(0, os.path.abspath("../.."))


# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.imgmath',
    'sphinx.ext.viewcode',
    'sphinxcontrib.napoleon'
    ]

# Napoleon settings
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_include_init_with_doc = True
napoleon_include_private_with_doc = False
napoleon_include_special_with_doc = False
napoleon_use_ivar = False
napoleon_use_param = True
napoleon_use_rtype = True

today_fmt = "%Y-%m-%d"
templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'wrenchkit'
copyright = '2026, wrenchkit developers'
author = 'wrenchkit developers'

with open(os.path.join(os.path.abspath("../.."), "VERSION")) as fh:
    release = fh.read().strip()
version = ".".join(release.split(".")[:2])

language = "en"
exclude_patterns = ['_build', '**tests**']
pygments_style = 'sphinx'
todo_include_todos = True
add_module_names = False


# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
htmlhelp_basename = 'wrenchkitdoc'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'scipy': ('https://docs.scipy.org/doc/scipy', None),
    'pandas': ('https://pandas.pydata.org/docs', None),
    }
