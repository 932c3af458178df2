// Copyright (c) 2026 The hrpnav Authors
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

#ifndef HRPNAV__ERROR_HPP_
#define HRPNAV__ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hrpnav
{

enum class ErrorCode
{
  InvalidArgument,
  PathTooShort,
  DegeneratePath,
  Io,
  Parse,
  UnsupportedVersion,
  Conflict,
  NothingToSend,
  NotFound,
  NoPathAvailable,
  InvalidStart,
  OutOfBounds,
  GeometryMismatch,
  DegenerateSample,
  ProtocolViolation,
  Malformed,
  NotAuthoritative,
  PortInUse,
};

/// Stable snake_case name used on the wire and in CLI diagnostics.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & what)
  : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept {return code_;}

private:
  ErrorCode code_;
};

}  // namespace hrpnav

#endif  // HRPNAV__ERROR_HPP_
