// Copyright 2026 The Robinet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "robinet/core/types.hpp"

namespace robinet::io {

/// CSV with a `# fingerprint=` comment line so every output can be traced
/// back to the config that produced it.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& fingerprint,
              const std::vector<std::string>& columns)
        : out_(path) {
        require(out_.good(), "CsvWriter: cannot open " + path);
        out_ << "# fingerprint=" << fingerprint << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
        out_.precision(17);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    static std::string num(double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }

  private:
    std::ofstream out_;
};

}  // namespace robinet::io
