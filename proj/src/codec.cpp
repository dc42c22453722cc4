/*
 * Copyright 2026 The imbal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "codec.hpp"

#include <openssl/evp.h>

#include <bit>

#include "imbal/error.hpp"

namespace imbal::codec {
namespace {

std::string Encode(const std::vector<unsigned char>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

std::vector<unsigned char> Decode(const std::string& text, size_t width) {
  if (text.size() % 4 != 0) Fail(ErrorCode::kParse, "base64 length is not a multiple of 4");
  std::vector<unsigned char> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) Fail(ErrorCode::kParse, "invalid base64 payload");
  size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<size_t>(n) - padding);
  if (out.size() % width != 0) Fail(ErrorCode::kParse, "base64 payload has a partial element");
  return out;
}

}  // namespace

std::string EncodeDoubles(const std::vector<double>& values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto bits = std::bit_cast<uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  }
  return Encode(bytes);
}

std::vector<double> DecodeDoubles(const std::string& text) {
  const auto bytes = Decode(text, 8);
  std::vector<double> out(bytes.size() / 8);
  for (size_t i = 0; i < out.size(); ++i) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= uint64_t{bytes[8 * i + b]} << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::string EncodeInts(const std::vector<int32_t>& values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 4);
  for (int32_t v : values) {
    const auto bits = static_cast<uint32_t>(v);
    for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  }
  return Encode(bytes);
}

std::vector<int32_t> DecodeInts(const std::string& text) {
  const auto bytes = Decode(text, 4);
  std::vector<int32_t> out(bytes.size() / 4);
  for (size_t i = 0; i < out.size(); ++i) {
    uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= uint32_t{bytes[4 * i + b]} << (8 * b);
    out[i] = static_cast<int32_t>(bits);
  }
  return out;
}

}  // namespace imbal::codec
