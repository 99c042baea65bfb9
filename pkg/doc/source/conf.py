# aesrank documentation build configuration file

import sys
import os

# the package lives two levels up
sys.path.insert(0, os.path.join(os.path.abspath('.'), os.pardir, os.pardir))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'aesrank'
copyright = u'2026, the aesrank developers'
version = '0.1.0'
release = '0.1.0'

exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'aesrankdoc'

latex_elements = {
}
latex_documents = [
  ('index', 'aesrank.tex', u'aesrank Documentation',
   u'the aesrank developers', 'manual'),
]

man_pages = [
    ('index', 'aesrank', u'aesrank Documentation',
     [u'the aesrank developers'], 1)
]

texinfo_documents = [
  ('index', 'aesrank', u'aesrank Documentation',
   u'the aesrank developers', 'aesrank', 'Rank-based distinguisher of AES encryption samples.',
   'Miscellaneous'),
]
