/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSIM_ERRORS_HPP_
#define FEDSIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fedsim {

// Base of every error the library raises. Callers that only care about
// "something in the simulator failed" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent experiment setup: dimension mismatch, empty dataset, bad key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's precondition (empty batch, k out of range).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Coefficient vector does not satisfy the simplex constraint.
class AggregationError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

// IDX decoding failure. The message names the byte offset.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Optimum oracle did not reach the gradient tolerance.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, double last_grad_norm)
      : Error(what), last_grad_norm_(last_grad_norm) {}
  double last_grad_norm() const { return last_grad_norm_; }

 private:
  double last_grad_norm_;
};

// A client failed inside a round; carries the offending client id.
class ClientError : public Error {
 public:
  ClientError(const std::string& what, int client_id)
      : Error(what), client_id_(client_id) {}
  int client_id() const { return client_id_; }

 private:
  int client_id_;
};

}  // namespace fedsim

#endif  // FEDSIM_ERRORS_HPP_
