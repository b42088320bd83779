//
// Copyright 2026 The privcnp Authors
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
//

#ifndef PRIVCNP_ERRORS_H_
#define PRIVCNP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace privcnp {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Root-finding did not converge, a matrix was not positive definite, or a
// loss became non-finite.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// Malformed input files: CSV ingestion, task files, checkpoints.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was requested in a mode that forbids it, e.g. disabling parts
// of the privacy mechanism outside training.
class RefusalError : public std::logic_error {
 public:
  explicit RefusalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace privcnp

#endif  // PRIVCNP_ERRORS_H_
