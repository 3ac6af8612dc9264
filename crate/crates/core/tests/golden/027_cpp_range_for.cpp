// decl: total_length words sum w
std::size_t total_length(const std::vector<std::string> &words)
{
    std::size_t sum = 0;
    for (const auto &w : words)
        sum += w.size();
    return sum;
}
