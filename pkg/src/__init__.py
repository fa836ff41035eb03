# liken-lab
