def average(nums):
    total = 0
    for n in nums:
        total = total + n
    return total / len(nums)
