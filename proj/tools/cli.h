// Copyright 2026 The Timebin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TIMEBIN_TOOLS_CLI_H
#define TIMEBIN_TOOLS_CLI_H

#include <iosfwd>
#include <string>
#include <vector>

namespace timebin {

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 1,
    kExitValidation = 2,
    kExitIo = 3,
    kExitDegenerate = 4,
};

/// Entry point of the `timebin` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace timebin

#endif
