// SPDX-License-Identifier: Apache-2.0
//
// refcal - reference-path calibration for bistatic OFDM sensing
// Copyright (C) 2026 The refcal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace refcal {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. AoA beyond +/-90 deg).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or invalid configuration: grid sizes, aliasing delays, bad config files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Degenerate geometry in localization.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Numerical failure in an estimator (zero antenna, rank-deficient covariance, ...).
class EstimationError : public Error {
public:
    using Error::Error;
};

/// No delay tap matched the known reference AoA. Usually means the reference is blocked.
class ReferenceNotFound : public Error {
public:
    using Error::Error;
};

/// Reference tap too weak (or dropped out) to calibrate against.
class WeakReference : public Error {
public:
    using Error::Error;
};

} // namespace refcal
