def total(nums):
    s = 0
    for n in nums:
        s = s + n
    return s
