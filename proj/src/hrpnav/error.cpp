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

#include "hrpnav/error.hpp"

namespace hrpnav
{

std::string_view error_code_name(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::PathTooShort: return "path_too_short";
    case ErrorCode::DegeneratePath: return "degenerate_path";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::UnsupportedVersion: return "unsupported_version";
    case ErrorCode::Conflict: return "conflict";
    case ErrorCode::NothingToSend: return "nothing_to_send";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::NoPathAvailable: return "no_path_available";
    case ErrorCode::InvalidStart: return "invalid_start";
    case ErrorCode::OutOfBounds: return "out_of_bounds";
    case ErrorCode::GeometryMismatch: return "geometry_mismatch";
    case ErrorCode::DegenerateSample: return "degenerate_sample";
    case ErrorCode::ProtocolViolation: return "protocol_violation";
    case ErrorCode::Malformed: return "malformed";
    case ErrorCode::NotAuthoritative: return "not_authoritative";
    case ErrorCode::PortInUse: return "port_in_use";
  }
  return "unknown";
}

}  // namespace hrpnav
