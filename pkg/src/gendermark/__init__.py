"""Corpus statistics for gender-adjective modification of occupation nouns.

The package splits into loading (lexicon), extraction (corpus), probability
reconstruction (distributions), markers (infotheory), general statistics
(stats), embedding-based coding (coding), a synthetic oracle (synth), and
report emission plus the command line front end (report, figures, cli).
"""

__version__ = "0.1.0"

from gendermark.errors import ValidationError

__all__ = ["ValidationError", "__version__"]
