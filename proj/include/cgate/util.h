// Copyright 2026 The cgate Authors
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

#ifndef CGATE_UTIL_H_
#define CGATE_UTIL_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cgate {

// All recoverable failures in the library surface as cgate::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// printf-style formatting into a std::string.
std::string StrFormat(const char* format, ...)
    __attribute__((format(printf, 1, 2)));

// Shortest "%.17g"-style text that parses back to the same double.
std::string FormatDouble(double value);

std::vector<std::string> SplitString(std::string_view text, char delimiter);

int ParseInt(std::string_view text);
double ParseDouble(std::string_view text);

// Unbiased integer in [0, bound) from a 64-bit engine. Unlike the standard
// distributions its output is identical across standard library vendors.
uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace cgate

#endif  // CGATE_UTIL_H_
