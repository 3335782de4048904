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
Host Information
CPU model, core counts and memory for benchmark reports, plus the default
worker count for batch prediction.
"""

import logging
import os
import platform
import socket
import subprocess
from typing import Dict

import numpy as np
import psutil

logger = logging.getLogger(__name__)

WORKERS_ENV = "LIGP_WORKERS"
SEED_ENV = "LIGP_SEED"
DEFAULT_SEED = 42


def get_cpu_model() -> str:
    """
    Get CPU model name in a cross-platform way

    Returns:
        CPU model string, or 'Unknown CPU' if not available
    """
    try:
        system = platform.system()

        if system == "Linux":
            try:
                with open("/proc/cpuinfo", "r") as f:
                    for line in f:
                        if line.startswith("model name"):
                            name = line.split(":", 1)[1]
                            for mark in ("(R)", "(TM)", "(r)", "(tm)"):
                                name = name.replace(mark, "")
                            return " ".join(name.split())
            except OSError:
                pass

        elif system == "Darwin":
            try:
                result = subprocess.run(
                    ["sysctl", "-n", "machdep.cpu.brand_string"],
                    capture_output=True,
                    text=True,
                    timeout=1,
                )
                if result.returncode == 0 and result.stdout.strip():
                    return result.stdout.strip()
            except Exception:
                pass

        proc = platform.processor()
        if proc and proc.strip():
            return proc.strip()
        return "Unknown CPU"

    except Exception as e:
        logger.warning(f"Failed to get CPU model: {e}")
        return "Unknown CPU"


def physical_cores() -> int:
    count = psutil.cpu_count(logical=False)
    if not count:
        count = psutil.cpu_count(logical=True) or 1
    return int(count)


def default_workers() -> int:
    """Worker count from LIGP_WORKERS, else the number of physical cores."""
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            value = int(raw)
            if value >= 1:
                return value
        except ValueError:
            pass
        logger.warning(f"Ignoring invalid {WORKERS_ENV}={raw!r}")
    return physical_cores()


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            logger.warning(f"Ignoring invalid {SEED_ENV}={raw!r}")
    return DEFAULT_SEED


def get_host_info() -> Dict:
    """Host metadata recorded alongside benchmark timings"""
    try:
        memory = psutil.virtual_memory()
        return {
            "hostname": socket.gethostname(),
            "cpu_model": get_cpu_model(),
            "physical_cores": physical_cores(),
            "logical_cores": psutil.cpu_count(logical=True) or 1,
            "ram_total_gb": round(memory.total / (1024**3), 2),
            "platform": platform.platform(),
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
    except Exception as e:
        logger.error(f"Error collecting host info: {e}")
        return {"hostname": "Unknown", "cpu_model": "Unknown CPU"}
