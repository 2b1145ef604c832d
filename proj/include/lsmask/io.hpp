// Copyright 2026 The lsmask Authors. All Rights Reserved.
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

#include <string>
#include <string_view>
#include <vector>

namespace lsmask {

/// Throws Error{Io} naming the path when the file cannot be read.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

/// Splits on '\n'. A trailing newline does not produce an empty last line.
/// Splits on LF, drops one trailing empty line and a CR ending each line.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::vector<std::string> split_whitespace(std::string_view text);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);
/// Shortest text that parses back to the same double.
std::string format_shortest(double v);
/// Parses a full string as double; throws std::invalid_argument on failure.
double parse_double(std::string_view s);

}  // namespace lsmask
