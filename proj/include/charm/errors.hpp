// Copyright 2026 The Charm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHARM_ERRORS_HPP_
#define CHARM_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace charm {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout, dimension or index mismatch between arguments.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A stored vector is too short to be retracted onto the sphere.
class DegenerateConfigurationError : public Error {
 public:
  using Error::Error;
};

// Input data failed validation (unit norm, schema, tolerance sign).
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Restricted solve at a singular configuration has no solution.
class NoSolutionError : public Error {
 public:
  NoSolutionError(const std::string& what, Eigen::VectorXd axis)
      : Error(what), axis_(std::move(axis)) {}

  const Eigen::VectorXd& axis() const { return axis_; }

 private:
  Eigen::VectorXd axis_;
};

// Head velocity has a component along the singular axis.
class UncontrollableDirectionError : public NoSolutionError {
 public:
  using NoSolutionError::NoSolutionError;
};

}  // namespace charm

#endif  // CHARM_ERRORS_HPP_
