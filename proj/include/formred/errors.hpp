/*
   Copyright 2025 The formred Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef FORMRED_ERRORS_HPP
#define FORMRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace formred {

/* Base of every error the library throws. */
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
  public:
    DivisionByZero() : Error("division by zero") {}
};

class IncompatibleTowers : public Error {
  public:
    IncompatibleTowers() : Error("algebraic numbers live in unrelated extension towers") {}
};

/* A contract of an engine was not met by its input. */
class PreconditionError : public Error {
  public:
    explicit PreconditionError(const std::string& what) : Error("precondition: " + what) {}
};

/* The truncation order is too low to decide a zero test or a valuation. */
class InsufficientOrder : public Error {
  public:
    explicit InsufficientOrder(const std::string& what) : Error("insufficient order: " + what) {}
};

class NotInvertible : public Error {
  public:
    explicit NotInvertible(const std::string& what) : Error("not invertible: " + what) {}
};

class SpectraOverlap : public Error {
  public:
    SpectraOverlap() : Error("Sylvester operands share an eigenvalue") {}
};

class NotSingular : public Error {
  public:
    NotSingular() : Error("matrix is nonsingular") {}
};

class AllNilpotent : public Error {
  public:
    AllNilpotent() : Error("matrix is nilpotent") {}
};

/* h = 1 dead end that needs the Arnold-Wasow fallback. */
class StalledH1 : public Error {
  public:
    explicit StalledH1(const std::string& what) : Error("stalled at h = 1: " + what) {}
};

/* The driver exceeded its step or ramification bound. */
class RecursionLimit : public Error {
  public:
    explicit RecursionLimit(const std::string& what) : Error("recursion limit: " + what) {}
};

class DimensionMismatch : public Error {
  public:
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line, int column)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line(line),
          column(column) {}
    int line;
    int column;
};

}  // namespace formred

#endif
