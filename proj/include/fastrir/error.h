// Copyright 2026 The fastrir Authors. All Rights Reserved.
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

#ifndef FASTRIR_ERROR_H_
#define FASTRIR_ERROR_H_

#include <stdexcept>
#include <string>

namespace fastrir {

// Base of every error the toolkit throws. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A value lies outside its documented domain. field() names the offender.
class RangeError : public Error {
 public:
  RangeError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// The requested T60 needs an average absorption coefficient above 1.
class InfeasibleT60Error : public Error {
 public:
  InfeasibleT60Error(double t60, double alpha)
      : Error("T60 " + std::to_string(t60) +
              " s is unattainable for this room (Sabine absorption " +
              std::to_string(alpha) + " > 1)"),
        t60_(t60),
        alpha_(alpha) {}
  double t60() const { return t60_; }
  double alpha() const { return alpha_; }

 private:
  double t60_;
  double alpha_;
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what) : Error(what) {}
};

// Decay analysis could not produce a T60 estimate.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& what, double reached_db)
      : Error(what), reached_db_(reached_db) {}
  double reached_db() const { return reached_db_; }

 private:
  double reached_db_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// A loss component became non-finite during training.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string component, const std::string& what)
      : Error(component + ": " + what), component_(std::move(component)) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

}  // namespace fastrir

#endif  // FASTRIR_ERROR_H_
