// SPDX-License-Identifier: Apache-2.0
//
// mimopa: distortion-aware power allocation for massive-MIMO OFDM downlinks
// Copyright (C) 2026 The mimopa authors
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

#ifndef MIMOPA_ERROR_HPP
#define MIMOPA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mimopa {

// Argument outside the mathematical domain of an operation (negative IBO,
// x < -1/e for Lambert W, non-positive powers, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A solver could not meet its contract: invalid bisection bracket, iteration
// cap reached, quadrature subdivision budget exhausted. The message carries
// the diagnostics needed to reproduce the failure.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mimopa

#endif
