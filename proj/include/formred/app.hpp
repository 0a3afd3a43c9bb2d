/*
   Copyright 2025 The formred Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef FORMRED_APP_HPP
#define FORMRED_APP_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace formred {

/* Exit status of the command line tool. */
enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitEngine = 3,
    kExitStalled = 4,
    kExitInsufficientOrder = 5,
};

/*
   formred SUBCOMMAND [options] [FILE | - | -e TEXT]

   args excludes the program name.  Results go to out, errors to err as a
   JSON object {"error": {...}}.
*/
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace formred

#endif
