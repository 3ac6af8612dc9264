// decl: clamp_value value lo hi
template <typename T>
T clamp_value(T value, T lo, T hi)
{
    if (value < lo) return lo;
    if (hi < value) return hi;
    return value;
}
