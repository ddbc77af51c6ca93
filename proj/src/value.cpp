#include "contraverify/value.hpp"

#include <cstdlib>

namespace contraverify {

Value
Value::of_int(std::int64_t v)
{
  Value r;
  r.type    = Type::Integer;
  r.integer = v;
  return r;
}

Value
Value::of_bool(bool v)
{
  Value r;
  r.type    = Type::Boolean;
  r.boolean = v;
  return r;
}

Value
Value::of_array(std::vector<std::int64_t> cells)
{
  Value r;
  r.type  = Type::IntArray;
  r.cells = std::move(cells);
  return r;
}

Value
Value::default_of(Type type)
{
  switch (type)
  {
    case Type::Boolean: return of_bool(false);
    case Type::IntArray: return of_array({});
    default: return of_int(0);
  }
}

std::string
to_string(const Value& v)
{
  switch (v.type)
  {
    case Type::Boolean: return v.boolean ? "True" : "False";
    case Type::IntArray:
    {
      std::string s = "[";
      for (std::size_t i = 0; i < v.cells.size(); ++i)
      {
        if (i) s += ", ";
        s += std::to_string(v.cells[i]);
      }
      return s + "]";
    }
    default: return std::to_string(v.integer);
  }
}

std::string
to_string(const ArgBinding& b, const Routine& r)
{
  std::string s;
  for (const auto& a : r.args)
  {
    auto it = b.find(a.name);
    if (it == b.end()) continue;
    if (!s.empty()) s += "; ";
    if (it->second.type == Type::IntArray)
    {
      s += a.name + ".count = " + std::to_string(it->second.count());
      for (std::size_t i = 0; i < it->second.cells.size(); ++i)
        s += ", " + a.name + "[" + std::to_string(i + 1)
             + "] = " + std::to_string(it->second.cells[i]);
    }
    else
    {
      s += a.name + " = " + to_string(it->second);
    }
  }
  return s;
}

std::int64_t
euclid_div(std::int64_t a, std::int64_t b)
{
  std::int64_t q = a / b;
  std::int64_t r = a % b;
  if (r < 0) q += b > 0 ? -1 : 1;
  return q;
}

std::int64_t
euclid_mod(std::int64_t a, std::int64_t b)
{
  std::int64_t r = a % b;
  if (r < 0) r += std::llabs(b);
  return r;
}

}  // namespace contraverify
