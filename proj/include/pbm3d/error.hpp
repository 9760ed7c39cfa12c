/**********
 *   Copyright 2026 The polarbm3d authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#ifndef PBM3D_ERROR_HPP
#define PBM3D_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pbm3d {

// Base class for every toolkit error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument values (negative sigma, singular matrix, bad profile...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Shape problems: mismatched plane dimensions, empty images.
class StructuralError : public ValidationError {
public:
    explicit StructuralError(const std::string& msg) : ValidationError(msg) {}
};

// Unknown named entity (preset, method, fixture kind).
class LookupError : public ValidationError {
public:
    explicit LookupError(const std::string& msg) : ValidationError(msg) {}
};

// Out-of-range sample values where the format cannot represent them.
class RangeError : public ValidationError {
public:
    explicit RangeError(const std::string& msg) : ValidationError(msg) {}
};

// File system / codec failures.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class MissingFileError : public IoError {
public:
    explicit MissingFileError(const std::string& msg) : IoError(msg) {}
};

class UnsupportedFormatError : public IoError {
public:
    explicit UnsupportedFormatError(const std::string& msg) : IoError(msg) {}
};

}  // namespace pbm3d

#endif  // PBM3D_ERROR_HPP
