"""List PAC learning toolkit for finite multiclass hypothesis classes."""

__version__ = '0.1.0'
