from typing import List, Optional, TypeAlias, Union

import numpy as np
from numpy.typing import NDArray
from result import Result

# Generic Types
Vector: TypeAlias = NDArray[np.float64]
Matrix: TypeAlias = NDArray[np.float64]
Label: TypeAlias = Optional[Union[int, float]]
Labels: TypeAlias = Optional[NDArray]

# Input Types
PointInput: TypeAlias = Union[Vector, Matrix]
LabelInput: TypeAlias = Union[Label, Labels]

# Collection Types
ErrorList: TypeAlias = List[str]

# Result types
ValidationResult: TypeAlias = Result[object, ErrorList]
