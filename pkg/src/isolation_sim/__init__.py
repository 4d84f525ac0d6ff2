"""Priority-construction simulator for an isolated d.c.e. degree"""

__version__ = "0.1.0"
