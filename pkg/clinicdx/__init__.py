"""Диагностика расписаний амбулаторного приема"""

__version__ = "1.0.0"
