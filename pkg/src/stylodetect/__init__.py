"""Stylometric detection of AI-generated scientific abstracts.

The pipeline turns labeled abstract corpora into a 115-column feature
matrix (10 semantic + 102 linguistic + 3 pragmatic densities) and trains
five classical classifiers implemented from scratch on top of numpy.
"""

__version__ = "0.1.0"
