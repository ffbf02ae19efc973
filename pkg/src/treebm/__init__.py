"""Patterson-Sullivan and Bowen-Margulis measures on metric graphs and their cover trees."""

__version__ = "0.1.0"
