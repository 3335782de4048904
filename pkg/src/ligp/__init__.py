# SPDX-FileCopyrightText: Copyright (c) 2025 The ligp authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
ligp - Locally induced Gaussian process regression.

Local approximate GP prediction with inducing points chosen by weighted
integrated mean-squared error, space-filling templates, local approximate GP
comparators and a benchmark harness.
"""

__version__ = "0.1.0"
__author__ = "The ligp authors"
__license__ = "Apache-2.0"

from . import gp_core
from . import criteria
from . import local_design
from . import predictor
from . import bench

__all__ = ["gp_core", "criteria", "local_design", "predictor", "bench"]
