#pragma once

#include <string>
#include <vector>

#include "cmnls/fields.hpp"

namespace cmnls {

enum class ComplexEncoding { Base64, Pairs };

// Dataset JSON: {"format":"cmnls-fielddata","version":1,"params":{...},
// "x_grid":{start,step,count},"t_grid":{...},"tolerances":{...},
// "encoding":"base64"|"pairs","u0":...,"interior":{"u":...,"v":...}|null,
// "metadata":{...}}. Base64 payloads are little-endian IEEE doubles, re/im
// interleaved. Pair payloads are arrays of [re, im].
std::string field_data_to_json(const FieldData& fd, ComplexEncoding enc = ComplexEncoding::Base64);
// Throws SchemaError for malformed documents, then runs check_field_data.
FieldData field_data_from_json(const std::string& text);

void save_field_data(const FieldData& fd, const std::string& path,
                     ComplexEncoding enc = ComplexEncoding::Base64);
FieldData load_field_data(const std::string& path);

std::string encode_base64(const std::vector<cplx>& v);
std::vector<cplx> decode_base64(const std::string& s);

// Two-column-per-complex CSV: header, then "s,re,im" rows.
void write_trace_csv(const std::string& path, const std::string& coord_name,
                     const std::vector<double>& coord, const std::vector<std::string>& names,
                     const std::vector<std::vector<cplx>>& traces);

}  // namespace cmnls
