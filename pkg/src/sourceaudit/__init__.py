"""Source-diversity audit engine for news articles.

Extracts quotes, speakers, titles, and organizations from article text,
predicts speaker gender and race/ethnicity from names, aggregates
per-author/site/period statistics, and serves everything over HTTP.
"""

__version__ = "0.1.0"
