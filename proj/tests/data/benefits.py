#!/usr/bin/env python3
# Copyright 2026 The datamin authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Line-protocol benefits program: salary -> true iff salary < 10000."""

import sys

for line in sys.stdin:
    coords = line.rstrip("\n").split("\t")
    print("true" if int(coords[0]) < 10000 else "false", flush=True)
