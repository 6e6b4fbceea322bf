/*
 Copyright 2026 The tablefuse Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tablefuse
{

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Inverted or non-finite coordinates, or a normalized box outside [0,1].
class InvalidBox : public Error
{
public:
    using Error::Error;
};

/// GIoU is undefined when both boxes have zero area.
class DegeneratePair : public Error
{
public:
    using Error::Error;
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
};

class EmptyInput : public Error
{
public:
    using Error::Error;
};

/// Two detected cells resolved to the same lattice slot under the strict policy.
class SlotConflict : public Error
{
public:
    using Error::Error;
};

/// Fewer predictions than ground-truth objects.
class SizeMismatch : public Error
{
public:
    using Error::Error;
};

/// Positional word accuracy on grids of different shape.
class ShapeMismatch : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

/// Malformed input document. Carries the 1-based line (0 when unknown) and
/// the dotted path of the offending field.
class ParseError : public Error
{
public:
    ParseError(const std::string& source, std::size_t line, const std::string& field,
               const std::string& what)
        : Error(format(source, line, field, what)), m_line(line), m_field(field)
    {
    }

    std::size_t line() const { return m_line; }
    const std::string& field() const { return m_field; }

private:
    static std::string format(const std::string& source, std::size_t line,
                              const std::string& field, const std::string& what)
    {
        std::string out = source.empty() ? std::string("<input>") : source;
        if (line > 0)
            out += ":" + std::to_string(line);
        if (!field.empty())
            out += ": field '" + field + "'";
        return out + ": " + what;
    }

    std::size_t m_line;
    std::string m_field;
};

} // namespace tablefuse
