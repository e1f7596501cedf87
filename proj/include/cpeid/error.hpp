// Copyright 2026 The CPE-Identifier Authors
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

#ifndef CPEID_ERROR_HPP_
#define CPEID_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpeid {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document. offset is a byte offset for JSON inputs and a
// 1-based line number for line-oriented formats (see is_line).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, bool is_line = false)
      : Error(what), offset_(offset), is_line_(is_line) {}
  std::size_t offset() const { return offset_; }
  bool is_line() const { return is_line_; }

 private:
  std::size_t offset_;
  bool is_line_;
};

class CpeError : public Error {
 public:
  enum class Kind { kUnsupportedVersion, kMalformed };
  CpeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two spans claim the same token.
class OverlapError : public Error {
 public:
  using Error::Error;
};

class BioError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class LabelSetError : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

// A remote tagger or synonym provider could not be reached or answered badly.
class TransportError : public Error {
 public:
  TransportError(const std::string& endpoint, const std::string& what)
      : Error(endpoint + ": " + what), endpoint_(endpoint) {}
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
};

class ProviderContractError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage ran before the stage that produces its input.
class PrerequisiteError : public Error {
 public:
  PrerequisiteError(const std::string& what, const std::string& producer)
      : Error(what), producer_(producer) {}
  const std::string& producer() const { return producer_; }

 private:
  std::string producer_;
};

}  // namespace cpeid

#endif  // CPEID_ERROR_HPP_
