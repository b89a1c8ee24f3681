from .models import *
from .exceptions import *
